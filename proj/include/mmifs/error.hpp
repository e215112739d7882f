#ifndef MMIFS_ERROR_HPP
#define MMIFS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mmifs {

class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration or usage; maps to CLI exit code 2.
class config_error : public error {
  public:
    using error::error;
};

}  // namespace mmifs

#endif
