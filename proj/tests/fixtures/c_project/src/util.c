#include "util.h"

int util_min(int a, int b) {
    return a < b ? a : b;
}

int util_max(int a, int b) {
    return a > b ? a : b;
}

int util_clamp(int v, int lo, int hi) {
    return util_min(util_max(v, lo), hi);
}
