#include <math.h>
#include <stdio.h>
#include <string.h>
#include "xisub.h"

int main(void) {
    XisubSphereIndex idx;
    if (xisub_sphere_index(2, 1, 1.0, 1, &idx) != XISUB_STATUS_OK || idx.index != 3) return 1;
    if (xisub_sphere_index(0, 1, 1.0, 1, &idx) != XISUB_STATUS_INVALID_ARGUMENT) return 2;
    if (strlen(xisub_last_error()) == 0) return 3;

    XisubCurve *curve = NULL;
    if (xisub_xi_curve(1.0, 0.0, 1.5707963267948966, 0.3, 20.0, 0.0, &curve) != XISUB_STATUS_OK) return 4;
    if (xisub_curve_len(curve) < 100 || !(xisub_curve_drift(curve) <= 1e-8)) return 5;
    XisubCurveSample s;
    if (xisub_curve_sample(curve, 0, &s) != XISUB_STATUS_OK || fabs(s.x - 1.0) > 0) return 6;
    xisub_curve_free(curve);

    const char *argv[] = {"index", "--m", "2", "--p", "1", "--r", "1"};
    XisubReport *rep = NULL;
    if (xisub_run(7, argv, &rep) != XISUB_STATUS_OK) return 7;
    if (!xisub_report_pass(rep) || xisub_report_exit_code(rep) != 0) return 8;
    if (strstr(xisub_report_json(rep), "\"schema\": 1") == NULL) return 9;
    xisub_report_free(rep);

    printf("ok %s\n", xisub_version());
    return 0;
}
