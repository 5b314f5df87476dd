#include <stdio.h>
#include <string.h>
#include "mixedflow.h"

int main(void) {
    MfSimulation *sim = NULL;
    if (mf_simulation_new(2, 1.0, -1, "mean", 8, &sim) != MF_STATUS_OK) {
        fprintf(stderr, "new: %s\n", mf_last_error());
        return 1;
    }
    size_t count = 0;
    mf_simulation_coeff_count(sim, &count);
    double coeffs[81] = {0};
    if (count != 81) return 2;
    coeffs[4] = 1e-4; /* zonal degree-2 */
    if (mf_simulation_set_coeffs(sim, coeffs, count) != MF_STATUS_OK) return 3;
    if (mf_simulation_advance(sim, 10, 1e-3) != MF_STATUS_OK) return 4;
    mf_simulation_get_coeffs(sim, coeffs, count);
    double t = 0.0;
    mf_simulation_time(sim, &t);
    printf("t=%.6f a=%.12e\n", t, coeffs[4]);
    if (mf_simulation_new(2, 1.0, 7, "mean", 8, NULL) != MF_STATUS_NULL_POINTER) return 5;
    MfSimulation *bad = NULL;
    if (mf_simulation_new(2, 1.0, 7, "mean", 8, &bad) != MF_STATUS_CONFIG || bad != NULL) return 6;
    if (strlen(mf_last_error()) == 0) return 7;
    mf_simulation_free(sim);
    return 0;
}
