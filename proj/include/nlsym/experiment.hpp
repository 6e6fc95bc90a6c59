#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlsym/evolution.hpp"
#include "nlsym/ground_state.hpp"
#include "nlsym/thresholds.hpp"

namespace nlsym {

/// Initial-data recipes. All are symmetrized under the experiment group and
/// validated for boundary decay before running.
struct Recipe {
    enum class Kind { ScaledGroundState, SymmetrizedBumps, OddDipole };
    Kind kind = Kind::ScaledGroundState;
    double amplitude = 1.0;
    double separation = 10.0;                 // odd_dipole: distance between bumps
    std::vector<std::vector<double>> positions;  // symmetrized_bumps
    std::vector<double> amplitudes;              // symmetrized_bumps
    double bump_width = 1.0;                     // symmetrized_bumps Gaussian width
    bool boost = false;                          // apply the rest-frame boost
    std::optional<std::vector<double>> boost_xi; // explicit boost frequency

    static Recipe parse(const std::string& text);
    std::string describe() const;
};

struct ExperimentSpec {
    NlsParameters params;
    Grid grid;
    SymmetryGroup group;
    Recipe recipe;
    EvolveConfig evolve;
    std::string out_dir;
    std::string label = "run";
    bool both_directions = true;  // verify the negative-time alternative too
};

enum class Agreement { Confirmed, Contradicted, Inconclusive, Failed };
std::string to_string(Agreement a);

struct ExperimentResult {
    Prediction prediction;
    Outcome outcome = Outcome::Undecided;
    Outcome outcome_backward = Outcome::Undecided;
    Agreement agreement = Agreement::Inconclusive;
    std::string error;
    std::map<std::string, std::string> artifacts;  // name -> path
    std::string label;
};

/// Deterministic field from the recipe, symmetrized and decay-validated.
ComplexField build_initial_data(const ExperimentSpec& spec);

/// predict -> evolve (both time directions for the blow-up alternative via
/// conjugation) -> compare -> persist manifest, trajectory, snapshots.
ExperimentResult run_experiment(const ExperimentSpec& spec, ThresholdTable& table);

struct SweepPoint {
    std::string key;    // varied parameter name
    double value = 0;
};

struct SweepRow {
    SweepPoint point;
    double action = 0;
    double virial = 0;
    PredictionClass prediction = PredictionClass::OutOfTheory;
    Outcome outcome = Outcome::Undecided;
    Agreement agreement = Agreement::Inconclusive;
    std::string error;
};

/// Runs the spec once per varied value (bounded worker pool; per-run failures
/// isolated) and writes a phase-diagram CSV.
std::vector<SweepRow> sweep(const ExperimentSpec& base, const std::string& vary_key,
                            const std::vector<double>& values, ThresholdTable& table,
                            int workers = 0);

void save_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

/// Ensures the table holds l values for the group and all of its proper
/// subgroups at the spec's parameters, computing them on demand (closed
/// form / shooting for the trivial group, variational descent otherwise).
void ensure_thresholds(const SymmetryGroup& group, const NlsParameters& params,
                       const Grid& grid, ThresholdTable& table);

}  // namespace nlsym
