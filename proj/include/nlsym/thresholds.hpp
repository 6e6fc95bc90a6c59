#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlsym/functionals.hpp"
#include "nlsym/symmetry.hpp"

namespace nlsym {

struct TrajectoryRecord;  // evolution.hpp

/// One ledger row: the restricted minimal action l, the subgroup-weighted
/// minimum m (absent for the trivial group), and the resulting threshold
/// s = min(m, l).
struct ThresholdEntry {
    std::string group_id;
    double omega = 0;
    std::optional<double> l_value;
    std::optional<double> m_value;
    std::optional<double> s_value;
    std::string chain;        // winning subgroup chain, e.g. "G<-G0"
    bool l_unattained = false; // l is an upper bound from a stalled minimizer
};

/// Read-mostly store of threshold values keyed by (group id, omega).
class ThresholdTable {
  public:
    void set_l(const std::string& group_id, double omega, double l, bool unattained = false);
    std::optional<double> l(const std::string& group_id, double omega) const;
    const ThresholdEntry* find(const std::string& group_id, double omega) const;
    ThresholdEntry& entry(const std::string& group_id, double omega);

    std::vector<const ThresholdEntry*> rows() const;

    /// CSV: group_id, omega, l, m, s, chain, flags
    void save_csv(const std::string& path) const;
    static ThresholdTable load_csv(const std::string& path);

  private:
    std::map<std::pair<std::string, double>, ThresholdEntry> entries_;
};

/// Group-restricted scattering threshold
///   s(G) = min( l(G), min over proper star subgroups G' of (#G/#G') s(G') ),
/// with s(trivial) = l(trivial). Memoized into the table; throws
/// MissingThreshold when an l value is absent.
double scattering_threshold(const SymmetryGroup& group, const NlsParameters& params,
                            ThresholdTable& table);

enum class PredictionClass { Scatter, BlowupOrGrowup, OutOfTheory };
std::string to_string(PredictionClass c);

struct Prediction {
    PredictionClass cls = PredictionClass::OutOfTheory;
    double action = 0;       // S_omega(u0)
    double virial = 0;       // K(u0)
    double threshold = 0;    // s(G)
    double l_value = 0;      // l(G)
    std::string group_id;
};

/// Classifies initial data below the thresholds: Scatter when K >= 0 and
/// S < s(G); BlowupOrGrowup when K < 0 and S < l(G); OutOfTheory otherwise.
/// Requires f to be G-invariant within 1e-8.
Prediction predict(const ComplexField& f, const SymmetryGroup& group,
                   const NlsParameters& params, ThresholdTable& table);

/// True iff the sign of K never flips along the recorded trajectory; on the
/// negative branch additionally checks the quantitative gap
/// K(u(t)) <= -4 (threshold - S) / d at every sample.
bool trapping_check(const TrajectoryRecord& trajectory, double threshold,
                    const NlsParameters& params);

}  // namespace nlsym
