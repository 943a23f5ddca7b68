#pragma once

#include <stdexcept>

namespace gclt {

// Gram matrix stayed numerically indefinite through the whole jitter ladder.
class SingularGramError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested spectral moment does not converge for the given (H, d, N).
class ConstantDivergence : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Weighted integrability test failed: the tail of |f(z)| |z|^{2/H-d} does not
// decay, so the weight norm is not finite.
class MembershipError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gclt
