#ifndef SGFRWT_ERRORS_HPP
#define SGFRWT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sgfrwt {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SGFRWT_DEFINE_ERROR(NAME)                  \
    class NAME : public Error {                    \
    public:                                        \
        using Error::Error;                        \
    }

// graph construction
SGFRWT_DEFINE_ERROR(IndexOutOfRange);
SGFRWT_DEFINE_ERROR(SelfLoop);
SGFRWT_DEFINE_ERROR(NonPositiveWeight);
SGFRWT_DEFINE_ERROR(ConflictingDuplicateEdge);
SGFRWT_DEFINE_ERROR(DegenerateInput);
SGFRWT_DEFINE_ERROR(EmptyGraph);

// spectral / numerics
SGFRWT_DEFINE_ERROR(NumericalFailure);
SGFRWT_DEFINE_ERROR(InvalidOrder);
SGFRWT_DEFINE_ERROR(DimensionMismatch);
SGFRWT_DEFINE_ERROR(InvalidParameter);
SGFRWT_DEFINE_ERROR(SingularSystem);
SGFRWT_DEFINE_ERROR(NegativeArgument);
SGFRWT_DEFINE_ERROR(NonConvergent);
SGFRWT_DEFINE_ERROR(FrameFailure);
SGFRWT_DEFINE_ERROR(NotConverged);

// file formats
SGFRWT_DEFINE_ERROR(BadMagic);
SGFRWT_DEFINE_ERROR(TruncatedFile);
SGFRWT_DEFINE_ERROR(UnsupportedFormat);
SGFRWT_DEFINE_ERROR(IoError);

#undef SGFRWT_DEFINE_ERROR

} // namespace sgfrwt

#endif // SGFRWT_ERRORS_HPP
