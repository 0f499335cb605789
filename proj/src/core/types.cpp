#include "hmem/core/types.hpp"

#include "hmem/text.hpp"

namespace hmem {

std::string normalize_entity_type(std::string_view label) {
  std::string t = text::canonicalize(label);
  for (std::string_view known : kEntityTypes) {
    if (t == known) return t;
  }
  return "other";
}

std::string render_turns(const std::vector<SpeakerTurn>& turns) {
  std::string out;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    if (i) out.push_back('\n');
    out.append(turns[i].speaker);
    out.append(": ");
    out.append(turns[i].utterance);
  }
  return out;
}

std::string canonical_triple_sentence(std::string_view subject, std::string_view relation,
                                      std::string_view object) {
  std::string s(subject);
  s.push_back(' ');
  s.append(relation);
  s.push_back(' ');
  s.append(object);
  return text::canonicalize(s);
}

}  // namespace hmem
