#include "nlsym/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "nlsym/evolution.hpp"

namespace nlsym {

namespace {
std::string format_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

void ThresholdTable::set_l(const std::string& group_id, double omega, double l,
                           bool unattained) {
    ThresholdEntry& e = entry(group_id, omega);
    e.l_value = l;
    e.l_unattained = unattained;
    e.s_value.reset();  // stale thresholds must be recomputed
    e.m_value.reset();
}

std::optional<double> ThresholdTable::l(const std::string& group_id, double omega) const {
    const ThresholdEntry* e = find(group_id, omega);
    return e ? e->l_value : std::nullopt;
}

const ThresholdEntry* ThresholdTable::find(const std::string& group_id, double omega) const {
    auto it = entries_.find({group_id, omega});
    return it == entries_.end() ? nullptr : &it->second;
}

ThresholdEntry& ThresholdTable::entry(const std::string& group_id, double omega) {
    auto [it, inserted] = entries_.try_emplace({group_id, omega});
    if (inserted) {
        it->second.group_id = group_id;
        it->second.omega = omega;
    }
    return it->second;
}

std::vector<const ThresholdEntry*> ThresholdTable::rows() const {
    std::vector<const ThresholdEntry*> out;
    out.reserve(entries_.size());
    for (const auto& kv : entries_) out.push_back(&kv.second);
    return out;
}

void ThresholdTable::save_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << "group_id,omega,l,m,s,chain,flags\n";
    for (const ThresholdEntry* e : rows()) {
        os << '"' << e->group_id << '"' << ',' << format_num(e->omega) << ','
           << (e->l_value ? format_num(*e->l_value) : "") << ','
           << (e->m_value ? format_num(*e->m_value) : "") << ','
           << (e->s_value ? format_num(*e->s_value) : "") << ','
           << '"' << e->chain << '"' << ',' << (e->l_unattained ? "l_unattained" : "")
           << "\n";
    }
}

ThresholdTable ThresholdTable::load_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    ThresholdTable table;
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        // fields: quoted id, omega, l, m, s, quoted chain, flags
        std::vector<std::string> fields;
        std::string cur;
        bool quoted = false;
        for (char c : line) {
            if (c == '"') {
                quoted = !quoted;
            } else if (c == ',' && !quoted) {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        fields.push_back(cur);
        if (fields.size() != 7) throw IoError("malformed threshold ledger row");
        ThresholdEntry e;
        e.group_id = fields[0];
        e.omega = std::stod(fields[1]);
        if (!fields[2].empty()) e.l_value = std::stod(fields[2]);
        if (!fields[3].empty()) e.m_value = std::stod(fields[3]);
        if (!fields[4].empty()) e.s_value = std::stod(fields[4]);
        e.chain = fields[5];
        e.l_unattained = fields[6].find("l_unattained") != std::string::npos;
        table.entries_[{e.group_id, e.omega}] = e;
    }
    return table;
}

double scattering_threshold(const SymmetryGroup& group, const NlsParameters& params,
                            ThresholdTable& table) {
    const std::string gid = group.id();
    if (const ThresholdEntry* e = table.find(gid, params.omega); e && e->s_value)
        return *e->s_value;

    const std::optional<double> l = table.l(gid, params.omega);
    if (group.is_trivial()) {
        if (!l) throw MissingThreshold("ledger lacks the unrestricted minimal action");
        ThresholdEntry& e = table.entry(gid, params.omega);
        e.s_value = *l;
        e.chain = "l";
        return *l;
    }

    double m = std::numeric_limits<double>::infinity();
    std::string m_chain;
    for (const SymmetryGroup& sub : proper_subgroups(group)) {
        if (!satisfies_star(group, sub)) continue;
        const double s_sub = scattering_threshold(sub, params, table);
        const double ratio = static_cast<double>(group.order()) / sub.order();
        const double candidate = ratio * s_sub;
        if (candidate < m) {
            m = candidate;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%g", ratio);
            m_chain = std::string(buf) + "*s(" + sub.id() + ")";
        }
    }

    if (!std::isfinite(m) && !l)
        throw NoStarSubgroup("no admissible subgroup and no restricted action in the ledger");
    if (!l && !std::isfinite(m))
        throw MissingThreshold("ledger lacks both branches");

    ThresholdEntry& e = table.entry(gid, params.omega);
    if (std::isfinite(m)) e.m_value = m;
    double s;
    if (!l) {
        s = m;  // conservative: only the subgroup branch is available
        e.chain = m_chain + " (no l)";
    } else if (std::isfinite(m) && m < *l) {
        s = m;
        e.chain = m_chain;
    } else {
        s = *l;
        e.chain = "l";
    }
    e.s_value = s;
    return s;
}

std::string to_string(PredictionClass c) {
    switch (c) {
        case PredictionClass::Scatter: return "SCATTER";
        case PredictionClass::BlowupOrGrowup: return "BLOWUP_OR_GROWUP";
        case PredictionClass::OutOfTheory: return "OUT_OF_THEORY";
    }
    return "?";
}

Prediction predict(const ComplexField& f, const SymmetryGroup& group,
                   const NlsParameters& params, ThresholdTable& table) {
    const double residual = symmetrization_residual(f, group);
    if (residual > 1e-8)
        throw NotGroupInvariant("initial data is not group invariant (residual " +
                                std::to_string(residual) + ")");
    const FunctionalReport rep = evaluate(f, params);
    Prediction pred;
    pred.group_id = group.id();
    pred.action = rep.action;
    pred.virial = rep.virial;
    pred.threshold = scattering_threshold(group, params, table);
    const std::optional<double> l = table.l(group.id(), params.omega);
    if (!l) throw MissingThreshold("ledger lacks the restricted action for this group");
    pred.l_value = *l;
    if (rep.virial >= 0 && rep.action < pred.threshold)
        pred.cls = PredictionClass::Scatter;
    else if (rep.virial < 0 && rep.action < pred.l_value)
        pred.cls = PredictionClass::BlowupOrGrowup;
    else
        pred.cls = PredictionClass::OutOfTheory;
    return pred;
}

bool trapping_check(const TrajectoryRecord& trajectory, double threshold,
                    const NlsParameters& params) {
    if (trajectory.reports.empty()) return true;
    const long long last = trajectory.diagnostics_valid_until >= 0
                               ? trajectory.diagnostics_valid_until
                               : static_cast<long long>(trajectory.size()) - 1;
    const double s0 = trajectory.reports.front().action;
    const bool positive_branch = trajectory.reports.front().virial >= 0;
    const double gap = -4.0 * (threshold - s0) / params.dim;  // negative-branch ceiling
    for (long long i = 0; i <= last; ++i) {
        const FunctionalReport& r = trajectory.reports[i];
        if (positive_branch) {
            const double tol = 1e-8 * (2.0 / params.dim) * r.gradient_sq + 1e-12;
            if (r.virial < -tol) return false;
        } else {
            const double slack = 1e-3 * std::abs(gap) + 1e-9 * (1.0 + r.gradient_sq);
            if (r.virial > gap + slack) return false;
        }
    }
    return true;
}

}  // namespace nlsym
