// Brute-force reference implementations the tests check the library against.
// Everything here is deliberately written from first principles, independent
// of the code paths under test (the eigensolver is a cyclic Jacobi, linear
// systems go through our own Gaussian elimination, and the image features
// are direct double loops).
#pragma once

#include <Eigen/Core>
#include <vector>

#include "modalfeat/image.hpp"

namespace oracles {

struct EigenSystem {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // orthonormal columns, matching order
};

// Cyclic Jacobi eigensolver for symmetric matrices.
EigenSystem jacobi_eigen(Eigen::MatrixXd a, int max_sweeps = 100);

// Gaussian elimination with partial pivoting.
Eigen::VectorXd gauss_solve(Eigen::MatrixXd a, Eigen::VectorXd b);

// Least-squares coordinates of rhs in the columns of q, via normal equations
// and gauss_solve.
Eigen::VectorXd lstsq_coords(const Eigen::MatrixXd& q, const Eigen::VectorXd& rhs);

// Directed cooccurrence counts: one count per ordered pixel pair at offset
// (d, theta) for every theta.
Eigen::MatrixXd glcm_bruteforce(const modalfeat::ImageBuffer& image, int distance,
                                const std::vector<double>& thetas, int levels);

// Haralick h1..h5 evaluated literally from a normalised GLCM (inverse
// difference moment with the 1/(1+(i-j)^2) weight).
std::vector<double> haralick5_bruteforce(const Eigen::MatrixXd& p);

// Per-pixel 8-neighbour LBP coding at radius 1, histogram normalised to 1.
std::vector<double> lbp_bruteforce(const modalfeat::ImageBuffer& image);

// Valid-mode sliding-window cross-correlation followed by the population
// variance of the outputs.
double sliding_variance(const modalfeat::ImageBuffer& image,
                        const Eigen::MatrixXd& kernel);

}  // namespace oracles
