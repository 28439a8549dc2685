#pragma once

#include <stdexcept>
#include <string>

namespace loopcoh {

// A result would live above the truncation degree of the model.
class CutoffExceeded : public std::runtime_error {
public:
    CutoffExceeded(int degree, int cutoff)
        : std::runtime_error("degree " + std::to_string(degree) + " exceeds cutoff " + std::to_string(cutoff)),
          degree_(degree),
          cutoff_(cutoff)
    {
    }
    int degree() const { return degree_; }
    int cutoff() const { return cutoff_; }

private:
    int degree_;
    int cutoff_;
};

class NonHomogeneous : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace loopcoh
