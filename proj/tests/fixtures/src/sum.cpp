// Sum of the positive entries.
#include <vector>

double sum_positive(const std::vector<double>& xs) {
  double total = 0.0;
  for (double x : xs) {
    total += x > 0 && x < 1e9 ? x : 0;
  }
  return total;
}
