#pragma once

#include <stdexcept>
#include <string>

namespace collapse {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition failures raised by the numerical modules.
class SingularFrame : public Error { public: using Error::Error; };
class DegreeOutOfRange : public Error { public: using Error::Error; };
class NotLieAlgebra : public Error { public: using Error::Error; };
class NotSymmetric : public Error { public: using Error::Error; };
class NotOrthonormal : public Error { public: using Error::Error; };
class NotUnimodular : public Error { public: using Error::Error; };
class ZeroVector : public Error { public: using Error::Error; };
class BranchUnavailable : public Error { public: using Error::Error; };
class RankAmbiguous : public Error { public: using Error::Error; };
class KTooLarge : public Error { public: using Error::Error; };
class NotSemisimple : public Error { public: using Error::Error; };
class TrivialBundle : public Error { public: using Error::Error; };
class NotInjective : public Error { public: using Error::Error; };
class NotPositiveDefinite : public Error { public: using Error::Error; };
class ParseError : public Error { public: using Error::Error; };

// CLI-facing errors; both map to exit code 2.
class ConfigInvalid : public Error { public: using Error::Error; };
class ScenarioUnknown : public Error { public: using Error::Error; };

}  // namespace collapse
