/* The public header must compile as C and link against the shared library. */
#include "splitbell/splitbell.h"

#include <math.h>
#include <stdio.h>

int main(void) {
  double b = 0.0;
  sb_state* s = NULL;
  sb_state_info info;
  if (sb_exact_chsh(0.0, &b) != SB_OK || fabs(b - 2.0 * sqrt(2.0)) > 1e-12) return 1;
  if (sb_prepare(0.1, 1.0, 6, NULL, &s) != SB_OK) return 1;
  if (sb_state_get_info(s, &info) != SB_OK || info.dimension != 2401) return 1;
  sb_state_free(s);
  printf("splitbell %s\n", sb_version());
  return 0;
}
