/* max of two ints */
#include <stdio.h>

int max(int a, int b) {
    if (a > b) {
        return a;
    }
    return b; // fallback
}
