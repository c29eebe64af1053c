#include "proxkit/kmm.hpp"

#include "proxkit/common.hpp"

#include <cmath>

namespace proxkit {

namespace {

// Gram matrix of exp(-gamma ||a_i - b_j||^2) between row sets.
Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double gamma) {
    const Eigen::VectorXd a_sq = a.rowwise().squaredNorm();
    const Eigen::VectorXd b_sq = b.rowwise().squaredNorm();
    Eigen::MatrixXd dist = (-2.0 * a * b.transpose());
    dist.colwise() += a_sq;
    dist.rowwise() += b_sq.transpose();
    return (-gamma * dist.array().max(0.0)).exp();
}

// 20 power-iteration steps estimate the top eigenvalue from below; 5%
// headroom turns the estimate into a usable Lipschitz bound for the step.
double lipschitz_bound(const Eigen::MatrixXd& K) {
    const auto n = K.rows();
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double lambda = 1.0;
    for (int it = 0; it < 20; ++it) {
        Eigen::VectorXd kv = K * v;
        const double norm = kv.norm();
        if (norm < 1e-300) break;
        v = kv / norm;
        lambda = v.dot(K * v);
    }
    return std::max(lambda, 1e-12) * 1.05;
}

}  // namespace

void KmmConfig::validate() const {
    if (!(kernel_width > 0.0)) throw config_error("kmm: kernel_width must be > 0");
    if (!(w_max >= 1.0)) throw config_error("kmm: w_max must be >= 1");
    if (max_iters < 1) throw config_error("kmm: max_iters must be >= 1");
    if (!(tolerance > 0.0)) throw config_error("kmm: tolerance must be > 0");
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    if (a.size() != b.size()) throw data_error("rbf_kernel: dimension mismatch");
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sq += d * d;
    }
    return std::exp(-gamma * sq);
}

KmmProblem build_problem(const Eigen::MatrixXd& positives, const Eigen::MatrixXd& negatives,
                         const KmmConfig& config) {
    config.validate();
    if (positives.rows() == 0 || negatives.rows() == 0)
        throw data_error("kmm: both label groups must be non-empty");
    if (positives.cols() != negatives.cols())
        throw data_error("kmm: feature dimensions differ between groups");

    KmmProblem problem;
    problem.n_pos = static_cast<int>(positives.rows());
    problem.n_neg = static_cast<int>(negatives.rows());
    problem.K = rbf_gram(positives, positives, config.kernel_width);
    // Exact symmetry and unit diagonal; the arithmetic above is only
    // symmetric to rounding.
    problem.K = ((problem.K + problem.K.transpose()) * 0.5).eval();
    problem.K.diagonal().setOnes();
    const double ratio = static_cast<double>(problem.n_pos) / problem.n_neg;
    problem.kappa =
        ratio * rbf_gram(positives, negatives, config.kernel_width).rowwise().sum();
    return problem;
}

Eigen::VectorXd project_sum_box(const Eigen::VectorXd& v, double target_sum, double upper) {
    const auto n = v.size();
    Eigen::VectorXd x = v;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);  // hyperplane correction
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n);  // box correction
    for (int it = 0; it < 1000; ++it) {
        const Eigen::VectorXd z = x + p;
        const Eigen::VectorXd y =
            z.array() + (target_sum - z.sum()) / static_cast<double>(n);
        p = z - y;
        const Eigen::VectorXd zb = y + q;
        const Eigen::VectorXd x_next = zb.array().max(0.0).min(upper);
        q = zb - x_next;
        const double step = (x_next - x).lpNorm<Eigen::Infinity>();
        x = x_next;
        if (step < 1e-13 && std::abs(x.sum() - target_sum) < 1e-10) break;
    }
    return x;
}

KmmSolution solve(const KmmProblem& problem, const KmmConfig& config) {
    config.validate();
    const int n = problem.n_pos;
    if (n <= 0 || problem.K.rows() != n || problem.kappa.size() != n)
        throw data_error("kmm: malformed problem");
    const double target = static_cast<double>(n);

    const auto objective = [&](const Eigen::VectorXd& w) {
        return 0.5 * w.dot(problem.K * w) - problem.kappa.dot(w);
    };

    KmmSolution result;
    Eigen::VectorXd w = project_sum_box(Eigen::VectorXd::Ones(n), target, config.w_max);
    double step = 1.0 / lipschitz_bound(problem.K);
    double f = objective(w);
    bool converged = false;
    int iter = 0;
    int backtracks = 0;
    while (iter < config.max_iters) {
        const Eigen::VectorXd grad = problem.K * w - problem.kappa;
        const Eigen::VectorXd w_next = project_sum_box(w - step * grad, target, config.w_max);
        const double f_next = objective(w_next);
        if (f_next > f + 1e-12) {
            // Should not trigger with a valid Lipschitz bound; halve and retry.
            step *= 0.5;
            if (++backtracks > 60) break;
            continue;
        }
        ++iter;
        const double decrease = f - f_next;
        w = w_next;
        f = f_next;
        if (decrease < config.tolerance) {
            converged = true;
            break;
        }
    }

    const Eigen::VectorXd grad = problem.K * w - problem.kappa;
    result.weights = w;
    result.converged = converged;
    result.iterations = iter;
    result.objective = f;
    result.kkt_residual = (w - project_sum_box(w - grad, target, config.w_max)).norm();
    return result;
}

SampleWeights compute_sample_weights(const Eigen::MatrixXd& carriage_features,
                                     const std::vector<int>& labels,
                                     const KmmConfig& config) {
    if (static_cast<std::size_t>(carriage_features.rows()) != labels.size())
        throw data_error("kmm: label count does not match feature rows");
    std::vector<Eigen::Index> pos_rows, neg_rows;
    for (std::size_t i = 0; i < labels.size(); ++i)
        (labels[i] == 1 ? pos_rows : neg_rows).push_back(static_cast<Eigen::Index>(i));
    if (pos_rows.empty() || neg_rows.empty())
        throw data_error("kmm: single-label dataset, regularization undefined");

    const auto gather = [&](const std::vector<Eigen::Index>& rows) {
        Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), carriage_features.cols());
        for (std::size_t i = 0; i < rows.size(); ++i)
            out.row(static_cast<Eigen::Index>(i)) = carriage_features.row(rows[i]);
        return out;
    };

    const KmmProblem problem = build_problem(gather(pos_rows), gather(neg_rows), config);
    const KmmSolution solution = solve(problem, config);

    SampleWeights weights;
    weights.converged = solution.converged;
    weights.weights.assign(labels.size(), 1.0);
    for (std::size_t i = 0; i < pos_rows.size(); ++i)
        weights.weights[static_cast<std::size_t>(pos_rows[i])] =
            solution.weights(static_cast<Eigen::Index>(i));
    return weights;
}

double mmd_squared(const Eigen::MatrixXd& positives, const Eigen::MatrixXd& negatives,
                   const Eigen::VectorXd& weights, double gamma) {
    if (positives.rows() == 0 || negatives.rows() == 0)
        throw data_error("mmd_squared: both groups must be non-empty");
    if (weights.size() != positives.rows())
        throw data_error("mmd_squared: weight count does not match positive rows");
    const double n_pos = static_cast<double>(positives.rows());
    const double n_neg = static_cast<double>(negatives.rows());
    const Eigen::MatrixXd kpp = rbf_gram(positives, positives, gamma);
    const Eigen::MatrixXd kpn = rbf_gram(positives, negatives, gamma);
    const Eigen::MatrixXd knn = rbf_gram(negatives, negatives, gamma);
    const double term_pp = weights.dot(kpp * weights) / (n_pos * n_pos);
    const double term_pn = 2.0 * weights.dot(kpn.rowwise().sum()) / (n_pos * n_neg);
    const double term_nn = knn.sum() / (n_neg * n_neg);
    return term_pp - term_pn + term_nn;
}

}  // namespace proxkit
