#pragma once

#include <stdexcept>
#include <string>

namespace qf {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define QF_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                 \
    public:                                                     \
        explicit Name(const std::string& msg) : Error(msg) {}   \
    }

QF_DEFINE_ERROR(NotHermitian);
QF_DEFINE_ERROR(NumericalFailure);
QF_DEFINE_ERROR(DimensionMismatch);
QF_DEFINE_ERROR(NotDensity);
QF_DEFINE_ERROR(NoNondegenerateObservable);
QF_DEFINE_ERROR(UnknownObservable);
QF_DEFINE_ERROR(UnknownState);
QF_DEFINE_ERROR(EmptyProbeSet);
QF_DEFINE_ERROR(NotCompatible);
QF_DEFINE_ERROR(NotProjection);
QF_DEFINE_ERROR(NotRankOne);
QF_DEFINE_ERROR(PartialFunction);
QF_DEFINE_ERROR(BasisNotOrthogonal);
QF_DEFINE_ERROR(BasisWrongSize);
QF_DEFINE_ERROR(MissingTransitionEntry);
QF_DEFINE_ERROR(UndecomposableProjection);
QF_DEFINE_ERROR(MissingSpectralData);
QF_DEFINE_ERROR(NotConvex);
QF_DEFINE_ERROR(IncompatibleContext);
QF_DEFINE_ERROR(ProblemTooLarge);
QF_DEFINE_ERROR(MalformedFamily);
QF_DEFINE_ERROR(InconsistentArrows);
QF_DEFINE_ERROR(ParseError);
QF_DEFINE_ERROR(SchemaError);
QF_DEFINE_ERROR(UsageError);

#undef QF_DEFINE_ERROR

}  // namespace qf
