/* The public header must compile as C and the library must link from C. */
#include <stdio.h>

#include "hospstay/hospstay.h"

int main(void) {
  hs_observations* obs = NULL;
  hs_curve* curve = NULL;
  if (hs_observations_create(&obs) != HS_OK) return 1;
  hs_observations_add(obs, 1.0, 1, 0, -1.0, HS_SEX_UNKNOWN);
  hs_observations_add(obs, 2.0, 0, 1, -1.0, HS_SEX_UNKNOWN);
  hs_observations_add(obs, 3.0, 1, 0, -1.0, HS_SEX_UNKNOWN);
  hs_observations_add(obs, 4.0, 0, 0, -1.0, HS_SEX_UNKNOWN);
  if (hs_estimate(obs, HS_EST_NPMCM, NULL, &curve) != HS_OK) {
    fprintf(stderr, "%s\n", hs_last_error());
    return 1;
  }
  const double plateau = hs_curve_plateau(curve);
  hs_curve_destroy(curve);
  hs_observations_destroy(obs);
  if (plateau != 0.5) {
    fprintf(stderr, "plateau %g\n", plateau);
    return 1;
  }
  printf("hospstay %s ok\n", hs_version());
  return 0;
}
