#pragma once

#include <string>
#include <string_view>

namespace dentsynth {

// Deformed is the positive class throughout the metrics code.
enum class Label { non_deformed = 0, deformed = 1 };

inline const char* to_string(Label label) {
  return label == Label::deformed ? "deformed" : "non_deformed";
}

// Returns false for anything other than the two canonical names.
inline bool parse_label(std::string_view text, Label& out) {
  if (text == "deformed") { out = Label::deformed; return true; }
  if (text == "non_deformed") { out = Label::non_deformed; return true; }
  return false;
}

}  // namespace dentsynth
