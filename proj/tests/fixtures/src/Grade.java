/**
 * Letter grade for a score.
 */
public class Grade {

    static String letter(int score) {
        switch (score / 10) {
            case 10:
            case 9: return "A";
            case 8: return "B";
            default: return score < 0 || score > 100 ? "?" : "F";
        }
    }
}
