#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace proxkit {

struct KmmConfig {
    double kernel_width = 1.0;  // gamma of the RBF kernel
    double w_max = 10.0;        // box upper bound on positive-sample weights
    int max_iters = 5000;
    double tolerance = 1e-9;  // stop when the objective decrease falls below this

    void validate() const;
};

// QP data for reweighting the positive group onto the negative group:
//   min 0.5 w'Kw - kappa'w   s.t.  sum w = n_pos,  0 <= w <= w_max
// K is the positive-group Gram matrix, kappa_i = (n_pos/n_neg) * sum_j
// k(pos_i, neg_j).
struct KmmProblem {
    Eigen::MatrixXd K;
    Eigen::VectorXd kappa;
    int n_pos = 0;
    int n_neg = 0;
};

struct KmmSolution {
    Eigen::VectorXd weights;
    bool converged = false;
    int iterations = 0;
    double objective = 0.0;
    double kkt_residual = 0.0;  // norm of the natural map w - P(w - grad)
};

// Per-sample training weights in dataset order: 1 for every negative sample,
// the QP solution for positives.
struct SampleWeights {
    std::vector<double> weights;
    bool converged = true;
};

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

// Rows of `positives`/`negatives` are standardized carriage feature vectors.
KmmProblem build_problem(const Eigen::MatrixXd& positives, const Eigen::MatrixXd& negatives,
                         const KmmConfig& config);

// Projected gradient descent with Dykstra projection onto the intersection of
// the sum constraint and the box. Non-convergence returns the best feasible
// iterate with converged = false.
KmmSolution solve(const KmmProblem& problem, const KmmConfig& config);

// Projection onto {sum w = target} intersected with [0, upper]^n. The final
// step is the box projection, so box bounds hold exactly; the sum holds to 1e-9.
Eigen::VectorXd project_sum_box(const Eigen::VectorXd& v, double target_sum, double upper);

SampleWeights compute_sample_weights(const Eigen::MatrixXd& carriage_features,
                                     const std::vector<int>& labels, const KmmConfig& config);

// Weighted squared maximum mean discrepancy between the positive group
// (weights w) and the negative group (unit weights).
double mmd_squared(const Eigen::MatrixXd& positives, const Eigen::MatrixXd& negatives,
                   const Eigen::VectorXd& weights, double gamma);

}  // namespace proxkit
