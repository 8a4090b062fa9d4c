#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "lyapcomp.h"

/* 1D Laplacian tridiag(-1, 2, -1) of order n in CSR form. */
static LcOperator *path_laplacian(size_t n) {
    size_t *rows = malloc((n + 1) * sizeof *rows);
    size_t *cols = malloc(3 * n * sizeof *cols);
    double *vals = malloc(3 * n * sizeof *vals);
    size_t nnz = 0;
    for (size_t i = 0; i < n; i++) {
        rows[i] = nnz;
        if (i > 0) { cols[nnz] = i - 1; vals[nnz++] = -1.0; }
        cols[nnz] = i; vals[nnz++] = 2.0;
        if (i + 1 < n) { cols[nnz] = i + 1; vals[nnz++] = -1.0; }
    }
    rows[n] = nnz;
    LcOperator *op = NULL;
    LcStatus s = lc_operator_from_csr(n, rows, cols, vals, &op);
    free(rows); free(cols); free(vals);
    return s == LC_STATUS_OK ? op : NULL;
}

int main(void) {
    const size_t n = 200;
    LcOperator *op = path_laplacian(n);
    if (!op) { fprintf(stderr, "operator creation failed\n"); return 1; }

    double *c = malloc(n * sizeof *c);
    for (size_t i = 0; i < n; i++) c[i] = 1.0 + sin(0.3 * (double)i);

    LcConfig cfg = lc_config_default();
    cfg.tol = 1e-8;
    LcSolution *sol = NULL;
    LcStatus s = lc_solve(op, c, n, &cfg, &sol);
    if (s != LC_STATUS_OK) {
        char msg[256];
        lc_last_error(msg, sizeof msg);
        fprintf(stderr, "solve failed (%s): %s\n", lc_status_string(s), msg);
        return 1;
    }
    LcReport rep;
    lc_solution_report(sol, &rep);
    size_t r = lc_solution_rank(sol);
    double *z = malloc(n * r * sizeof *z);
    if (lc_solution_factor(sol, z, n * r - 1) != LC_STATUS_BUFFER_TOO_SMALL) return 1;
    if (lc_solution_factor(sol, z, n * r) != LC_STATUS_OK) return 1;
    double res = -1.0;
    if (lc_solution_residual(op, sol, c, n, &res) != LC_STATUS_OK) return 1;
    printf("rank %zu matvecs %llu cycles %zu peak %zu residual %.3e\n", r,
           (unsigned long long)rep.matvecs, rep.cycles, rep.peak_vectors, res);

    LcOperator *bad = NULL;
    double asym[4] = {1.0, 2.0, 0.0, 1.0};
    if (lc_operator_from_dense(2, asym, &bad) != LC_STATUS_INVALID_INPUT || bad) return 1;
    if (lc_last_error(NULL, 0) == 0) return 1;

    free(z); free(c);
    lc_solution_free(sol);
    lc_operator_free(op);
    return (res <= 1e-8 && rep.peak_vectors <= cfg.maxmem) ? 0 : 2;
}
