#ifndef UTIL_H
#define UTIL_H

int util_min(int a, int b);
int util_max(int a, int b);
int util_clamp(int v, int lo, int hi);

#endif
