#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "nonlocal_graphs.h"

int main(void) {
    NlgDatum *datum = NULL;
    if (nlg_datum_two_bump(0.5, 0.125, &datum) != NLG_STATUS_OK) return 10;

    NlgSolveParams p = nlg_solve_params_default();
    p.s = 0.1;
    p.cells_per_unit = 16;
    p.truncation = 2.0;
    NlgSolution *sol = NULL;
    if (nlg_solve(datum, &p, &sol) != NLG_STATUS_OK) return 11;

    size_t n = nlg_solution_len(sol);
    double *x = malloc(n * sizeof(double));
    double *u = malloc(n * sizeof(double));
    if (nlg_solution_copy(sol, x, u, n) != NLG_STATUS_OK) return 12;
    double left = nlg_solution_wall_jump(sol, NLG_BOUNDARY_LEFT);
    double right = nlg_solution_wall_jump(sol, NLG_BOUNDARY_RIGHT);
    if (!(left > 0.0) || fabs(left - right) > 1e-9) return 13;
    printf("n=%zu jump=%.6f iterations=%zu\n", n, left, nlg_solution_iterations(sol));

    p.s = 1.5;
    NlgSolution *bad = NULL;
    if (nlg_solve(datum, &p, &bad) != NLG_STATUS_INVALID_ORDER) return 14;
    if (nlg_last_error_message() == NULL) return 15;

    free(x);
    free(u);
    nlg_solution_free(sol);
    nlg_datum_free(datum);
    return 0;
}
