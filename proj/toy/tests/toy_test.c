#include <assert.h>
#include <stdio.h>
#include <string.h>

#include "../src/kv.h"

static void test_store(void) {
  Arena *a = arena_new(4096);
  Store *st = store_new(a, 8);
  char key[16];
  for (int i = 0; i < 40; ++i) {
    snprintf(key, sizeof(key), "k%d", i);
    store_put(st, key, i);
  }
  int v = -1;
  assert(store_get(st, "k7", &v) && v == 7);
  assert(store_put(st, "k7", 70) == 0);
  assert(store_get(st, "k7", &v) && v == 70);
  assert(!store_get(st, "missing", &v));
  assert(st->count == 40);
  assert(store_sum(st) == 780 - 7 + 70);
  arena_free(a);
}

static void test_buffers(void) {
  char small[4];
  assert(buf_copy(small, sizeof(small), "abcdef") == 3);
  assert(strcmp(small, "abc") == 0);
  int n = 0;
  assert(parse_int("-42", &n) && n == -42);
  assert(!parse_int("x", &n));
  int ring[5];
  unsigned head = 0;
  for (int i = 0; i < 12; ++i) ring_push(ring, 5, &head, i);
  assert(head == 2);
  assert(ring[1] == 11);
  int vals[6] = {1, 2, 3, 4, 5, 6};
  assert(checksum(vals, 6) == checksum(vals, 6));
  assert(hash_key("abc") != hash_key("abd"));
  unsigned bits[4] = {0, 0, 0, 0};
  for (unsigned b = 0; b < 128; b += 3) bitmap_set(bits, b);
  for (unsigned b = 0; b < 128; ++b) assert(bitmap_test(bits, b) == (b % 3 == 0));
  int table[8] = {0};
  for (unsigned b = 0; b < 96; b += 3) table[bits[b >> 5] & 7] = (int)b;
  assert(table[bits[2] & 7] >= 0);
}

int main(void) {
  test_store();
  test_buffers();
  puts("ok");
  return 0;
}
