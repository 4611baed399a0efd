#include "buffer.h"
#include "util.h"

void buffer_init(Buffer *b) {
    b->head = 0;
    b->len = 0;
}

int buffer_push(Buffer *b, int v) {
    if (b->len >= buffer_capacity())
        return 0;
    int idx = (b->head + b->len) % buffer_capacity();
    b->items[idx] = v;
    b->len++;
    return 1;
}

int buffer_pop(Buffer *b, int *out) {
    if (b->len == 0)
        return 0;
    *out = b->items[b->head];
    b->head = (b->head + 1) % buffer_capacity();
    b->len--;
    return 1;
}

int buffer_len(const Buffer *b) {
    return util_max(b->len, 0);
}
