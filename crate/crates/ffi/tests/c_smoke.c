#include <stdio.h>
#include <string.h>
#include "hypercone.h"

int main(void) {
    double apex_a[3] = {0.0, 0.0, 0.2}, axis_a[3] = {0.0, 0.0, 1.0};
    double apex_b[3] = {0.0, 0.0, -0.2}, axis_b[3] = {0.0, 0.0, -1.0};
    HcCone *a = NULL, *b = NULL, *c = NULL;
    bool flag = false;
    double margin = 0.0;
    char msg[256];

    if (hc_cone_new(apex_a, axis_a, 30.0, &a) != HC_STATUS_OK) return 1;
    if (hc_cone_new(apex_b, axis_b, 30.0, &b) != HC_STATUS_OK) return 2;
    if (hc_cones_disjoint(a, b, &flag, &margin) != HC_STATUS_OK || !flag) return 3;
    if (hc_common_complement_cone(a, b, &c) != HC_STATUS_OK) return 4;
    if (hc_cones_disjoint(c, a, &flag, &margin) != HC_STATUS_OK || !flag) return 5;
    if (hc_cone_new(apex_a, axis_a, 190.0, &c) != HC_STATUS_INVALID_INPUT) return 6;
    if (hc_last_error(msg, sizeof msg) == 0 || strlen(msg) == 0) return 7;
    printf("disjoint margin %.6f\n", margin);
    hc_cone_free(a);
    hc_cone_free(b);
    hc_cone_free(c);
    return 0;
}
