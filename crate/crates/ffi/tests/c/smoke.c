#include <math.h>
#include <stdio.h>

#include "parab.h"

int main(void) {
    ParabWeightU *w = NULL;
    if (parab_weight_u_new(0.5, 0.5, &w) != PARAB_STATUS_OK) return 1;
    double v = 0.0;
    if (parab_u_kernel(w, 0, 0.0, 0.25, 0.1, 0.5, &v) != PARAB_STATUS_OK) return 2;
    if (fabs(v - 1.0) > 1e-14) return 3;
    if (parab_u_basis(w, 0, 1, 2.0, 0.5, &v) != PARAB_STATUS_POINT_OUTSIDE_DOMAIN) return 4;
    char msg[128];
    if (parab_last_error_message(msg, sizeof msg) == 0) return 5;
    parab_weight_u_free(w);
    printf("ok %s\n", parab_version());
    return 0;
}
