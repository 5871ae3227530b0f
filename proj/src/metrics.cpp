#include "perfpred/metrics.hpp"

#include <cmath>

#include "perfpred/errors.hpp"

namespace perfpred {

double accuracy_of_scores(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
    if (scores.size() == 0) throw ArgumentError("accuracy of an empty dataset");
    if (scores.size() != labels.size())
        throw ArgumentError("score/label length mismatch");
    int correct = 0;
    for (Eigen::Index i = 0; i < scores.size(); ++i)
        if (sign_of(scores[i]) == labels[i]) ++correct;
    return static_cast<double>(correct) / scores.size();
}

double accuracy(const KernelModel& model, const Dataset& data) {
    if (data.n() == 0) throw ArgumentError("accuracy of an empty dataset");
    return accuracy_of_scores(predict(model, augment(data)), data.labels);
}

double consistency_linear(const Eigen::VectorXd& v1, const Eigen::VectorXd& v2) {
    if (v1.size() != v2.size()) throw ArgumentError("vector width mismatch");
    const double n1 = v1.norm();
    const double n2 = v2.norm();
    if (n1 <= 0.0 || n2 <= 0.0)
        throw ArgumentError("consistency undefined for a zero vector");
    const double c = v1.dot(v2) / (n1 * n2);
    return std::clamp(c, -1.0, 1.0);
}

Summary summarize(const std::vector<RrmTrace>& traces, int burn_in) {
    if (traces.empty()) throw ArgumentError("summarize needs at least one trace");

    std::vector<double> acc_trial_means, cons_trial_means;
    double acc_sum = 0.0, cons_sum = 0.0;
    long cells = 0;
    for (const RrmTrace& trace : traces) {
        double a = 0.0, c = 0.0;
        long k = 0;
        for (const RrmRecord& row : trace.rows) {
            if (row.t <= burn_in) continue;
            a += row.accuracy;
            c += row.consistency;
            ++k;
        }
        if (k == 0)
            throw ArgumentError("trace does not extend past the burn-in of " +
                                std::to_string(burn_in));
        acc_trial_means.push_back(a / k);
        cons_trial_means.push_back(c / k);
        acc_sum += a;
        cons_sum += c;
        cells += k;
    }

    auto population_std = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= v.size();
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        return std::sqrt(var / v.size());
    };

    Summary s;
    s.mean_accuracy = acc_sum / cells;
    s.mean_consistency = cons_sum / cells;
    s.std_accuracy = population_std(acc_trial_means);
    s.std_consistency = population_std(cons_trial_means);
    s.trials = static_cast<int>(traces.size());
    s.burn_in = burn_in;
    return s;
}

}  // namespace perfpred
