#pragma once

#include <stdexcept>
#include <string>

namespace dentsynth {

// Every failure raised by the library carries one of these kinds; the C API
// maps them onto its status codes.
enum class ErrorKind {
  parameter,      // argument outside its documented bounds
  parse,          // malformed text input (mesh, manifest, config)
  shape,          // mismatched array lengths or lattice resolutions
  geometry,       // degenerate geometric input
  lookup,         // unknown name (vertex group, shape key)
  configuration,  // config missing, contradictory or unknown key
  image,          // undecodable or wrong-sized image
  io,             // filesystem failure
  data,           // dataset-level contract violation
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace dentsynth
