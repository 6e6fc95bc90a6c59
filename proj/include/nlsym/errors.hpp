#pragma once

#include <stdexcept>
#include <string>

namespace nlsym {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define NLSYM_DEFINE_ERROR(Name)                                   \
    struct Name : Error {                                          \
        explicit Name(const std::string& msg) : Error(msg) {}      \
    }

// grids and fields
NLSYM_DEFINE_ERROR(DimensionMismatch);
NLSYM_DEFINE_ERROR(InvalidGrid);
NLSYM_DEFINE_ERROR(InvalidParameters);
NLSYM_DEFINE_ERROR(NonFinite);
NLSYM_DEFINE_ERROR(OffLatticeTranslation);
NLSYM_DEFINE_ERROR(NotDecayedAtBoundary);
NLSYM_DEFINE_ERROR(IoError);

// symmetry groups
NLSYM_DEFINE_ERROR(NotOrthogonal);
NLSYM_DEFINE_ERROR(NotClosed);
NLSYM_DEFINE_ERROR(AssumptionAViolated);
NLSYM_DEFINE_ERROR(MissingIdentity);
NLSYM_DEFINE_ERROR(NonGridCompatibleMatrix);
NLSYM_DEFINE_ERROR(NotASubgroup);
NLSYM_DEFINE_ERROR(GroupTooLarge);

// functionals
NLSYM_DEFINE_ERROR(ZeroField);
NLSYM_DEFINE_ERROR(ZeroPotentialTerm);
NLSYM_DEFINE_ERROR(UnresolvedAfterScaling);
NLSYM_DEFINE_ERROR(ZeroMass);
NLSYM_DEFINE_ERROR(OffLatticeFrequency);

// ground state
NLSYM_DEFINE_ERROR(WrongDimension);
NLSYM_DEFINE_ERROR(BracketNotFound);
NLSYM_DEFINE_ERROR(NoConvergence);
NLSYM_DEFINE_ERROR(CollapseToZero);
NLSYM_DEFINE_ERROR(NoDescent);

// thresholds
NLSYM_DEFINE_ERROR(MissingThreshold);
NLSYM_DEFINE_ERROR(NoStarSubgroup);
NLSYM_DEFINE_ERROR(NotGroupInvariant);

// evolution
NLSYM_DEFINE_ERROR(TooFewSamples);

// experiments
NLSYM_DEFINE_ERROR(RecipeInvalid);

#undef NLSYM_DEFINE_ERROR

}  // namespace nlsym
