#pragma once

#include <stdexcept>
#include <string>

namespace smokeflow {

// All library failures derive from Error. `kind` distinguishes bad inputs
// (paths, parameters, malformed files) from failures arising mid-computation;
// the CLI maps validation -> exit 1, runtime -> exit 2.
class Error : public std::runtime_error {
public:
    enum class Kind { validation, runtime };

    Error(Kind kind, const std::string& name, const std::string& what)
        : std::runtime_error(name + ": " + what), kind_(kind), name_(name) {}

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }

private:
    Kind kind_;
    std::string name_;
};

#define SMOKEFLOW_DEFINE_ERROR(NAME, KIND)                                   \
    class NAME : public Error {                                              \
    public:                                                                  \
        explicit NAME(const std::string& what)                               \
            : Error(Error::Kind::KIND, #NAME, what) {}                       \
    }

SMOKEFLOW_DEFINE_ERROR(MissingFile, validation);
SMOKEFLOW_DEFINE_ERROR(UnsupportedFormat, validation);
SMOKEFLOW_DEFINE_ERROR(CorruptHeader, validation);
SMOKEFLOW_DEFINE_ERROR(IoFailure, runtime);
SMOKEFLOW_DEFINE_ERROR(BadMagic, validation);
SMOKEFLOW_DEFINE_ERROR(SizeMismatch, validation);
SMOKEFLOW_DEFINE_ERROR(OrderOutOfRange, validation);
SMOKEFLOW_DEFINE_ERROR(NonFiniteInput, validation);
SMOKEFLOW_DEFINE_ERROR(DegenerateSize, validation);
SMOKEFLOW_DEFINE_ERROR(NonFiniteDivergence, runtime);
SMOKEFLOW_DEFINE_ERROR(TooFewPixels, validation);
SMOKEFLOW_DEFINE_ERROR(NotColor, validation);
SMOKEFLOW_DEFINE_ERROR(EmptyMask, validation);
SMOKEFLOW_DEFINE_ERROR(NoValidGradients, validation);
SMOKEFLOW_DEFINE_ERROR(TooSmall, validation);
SMOKEFLOW_DEFINE_ERROR(InvalidParameter, validation);

// DegenerateMixture is thrown both for bad configuration (K < 2) and for a
// prior collapsing during EM, so the kind is chosen at the throw site.
class DegenerateMixture : public Error {
public:
    explicit DegenerateMixture(const std::string& what,
                               Error::Kind kind = Error::Kind::runtime)
        : Error(kind, "DegenerateMixture", what) {}
};

#undef SMOKEFLOW_DEFINE_ERROR

}  // namespace smokeflow
