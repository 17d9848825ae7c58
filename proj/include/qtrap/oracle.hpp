#pragma once

// Closed forms of the diagonal moments A^(-1)_mnn, A^(3)_mnn and
// C_mnn = -int_0^1 s (dJ_m(x_mn s)/ds)^2 ds, with independent quadrature
// references. Test-surface machinery: spectral never consumes these values.
//
// Identities used by the corrected forms (x = x_mn):
//   J_m(x s)/s = x (J_{m-1}(x s) + J_{m+1}(x s)) / (2m)
//   A^(-1) = 4^-m (2m-1)! x^2m 2F3~(m, m+1/2; m+1, m+1, 2m+1; -x^2)
//   A^(3)  = 4^-m m(m+1) (2m-1)! x^2m 2F3~(m+1/2, m+2; m+1, m+3, 2m+1; -x^2),  m >= 1
//          = 2F3(1/2, 2; 1, 1, 3; -x^2) / 4,                                 m = 0
//   C      = m^2 A^(-1) - x^2 J_{m+1}(x)^2 / 2
// where 2F3~ is the regularized series.

namespace qtrap::oracle {

enum class ClosedFormPath { hypergeometric, special_case_m0, quadrature_fallback };

const char* to_string(ClosedFormPath path);

struct ClosedFormResult {
  double value = 0.0;
  ClosedFormPath path = ClosedFormPath::hypergeometric;
};

/// DomainError for m = 0, where the integral diverges.
ClosedFormResult a_neg1_closed(int m, int n);
ClosedFormResult a3_closed(int m, int n);
ClosedFormResult c1_closed(int m, int n);

/// Adaptive quadrature references.
double a_neg1_quadrature(int m, int n);
double a3_quadrature(int m, int n);
double c1_quadrature(int m, int n);

/// Uncorrected closed forms (no x^2m factors, the 3F4 C expression), kept to
/// document where they disagree with quadrature. Throw CancellationError where
/// the series is unusable.
namespace printed {
double a_neg1(int m, int n);
double a3(int m, int n);
double c1(int m, int n);
}  // namespace printed

}  // namespace qtrap::oracle
