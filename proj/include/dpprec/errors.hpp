#ifndef DPPREC_ERRORS_HPP_
#define DPPREC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace dpprec {

class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define DPPREC_DEFINE_ERROR(Name)                                      \
  class Name##Error : public Error {                                   \
   public:                                                             \
    explicit Name##Error(const std::string& what) : Error(#Name, what) {} \
  }

DPPREC_DEFINE_ERROR(NonFinite);
DPPREC_DEFINE_ERROR(ConvergenceFailure);
DPPREC_DEFINE_ERROR(InvalidBudget);
DPPREC_DEFINE_ERROR(SingularMap);
DPPREC_DEFINE_ERROR(UnnormalizedData);
DPPREC_DEFINE_ERROR(NotPositiveDefinite);
DPPREC_DEFINE_ERROR(ZeroDenominator);
DPPREC_DEFINE_ERROR(EmptyTruth);
DPPREC_DEFINE_ERROR(SingleClassData);
DPPREC_DEFINE_ERROR(LengthMismatch);
DPPREC_DEFINE_ERROR(AllZeroData);
DPPREC_DEFINE_ERROR(DegenerateModel);
DPPREC_DEFINE_ERROR(Parse);
DPPREC_DEFINE_ERROR(DimensionMismatch);
DPPREC_DEFINE_ERROR(Asymmetric);

#undef DPPREC_DEFINE_ERROR

}  // namespace dpprec

#endif  // DPPREC_ERRORS_HPP_
