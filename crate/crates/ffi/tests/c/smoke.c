#include <math.h>
#include <stdio.h>
#include "steinlab.h"

int main(void) {
    SlPmf *zip = NULL, *po = NULL;
    if (sl_pmf_zip(0.9, 2.0, 1e-15, &zip) != SL_STATUS_OK) return 10;
    if (sl_pmf_poisson(1.8, 1e-15, &po) != SL_STATUS_OK) return 11;

    double tv = 0.0, err = 0.0;
    if (sl_tv_distance(zip, po, &tv, &err) != SL_STATUS_OK) return 12;

    SlBound b;
    if (sl_neg_assoc_bound(1.8, 1.8 + 0.9 * 0.1 * 4.0, 0.9, &b) != SL_STATUS_OK) return 13;
    if (tv > b.total + err) return 14;

    if (sl_pmf_poisson(-1.0, 1e-15, &po) != SL_STATUS_INVALID_ARGUMENT) return 15;
    if (sl_last_error()[0] == '\0') return 16;

    sl_pmf_free(zip);
    sl_pmf_free(po);
    printf("%s %.6f %.6f\n", sl_version(), tv, b.total);
    return 0;
}
