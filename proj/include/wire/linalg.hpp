#pragma once

#include <vector>

namespace wire {

// Symmetric eigendecomposition by Householder tridiagonalization followed by
// implicit-shift QL. On return `a` holds orthonormal eigenvectors in columns
// (a[i*n + j] = component i of eigenvector j) and `w` the eigenvalues in
// ascending order. Throws std::runtime_error if QL fails to converge.
void eigen_symmetric(std::vector<double>& a, std::vector<double>& w, int n);

}  // namespace wire
