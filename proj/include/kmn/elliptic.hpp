#ifndef KMN_ELLIPTIC_HPP
#define KMN_ELLIPTIC_HPP

namespace kmn::waves {

struct JacobiTriple {
  double sn;
  double cn;
  double dn;
};

/// Jacobi elliptic functions by the arithmetic-geometric mean and descending
/// Landen recursion. The second argument is the modulus k in [0, 1], not the
/// parameter k^2. k = 1 is evaluated through its closed form (tanh, sech).
JacobiTriple jacobi_elliptic(double u, double modulus);

double jacobi_sn(double u, double modulus);
double jacobi_cn(double u, double modulus);
double jacobi_dn(double u, double modulus);

}  // namespace kmn::waves

#endif  // KMN_ELLIPTIC_HPP
