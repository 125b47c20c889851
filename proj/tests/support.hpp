// Fixture loading shared by the test suites.

#ifndef AET_TESTS_SUPPORT_HPP
#define AET_TESTS_SUPPORT_HPP

#include <filesystem>
#include <string>

#include "aet/store.hpp"
#include "aet/syntax.hpp"
#include "aet/theory.hpp"

namespace aet::testing {

inline std::string data_path(const std::string& rel) { return std::string(AET_DATA_DIR) + "/" + rel; }

struct Fixture {
  Session session;
  CompiledTheory theory;
  RelStore store;
};

// Compiles the theory and loads every CSV in the same directory whose stem
// names a declared database relation.
inline void load_fixture(Fixture& fx, const std::string& theory_rel) {
  std::filesystem::path path = data_path(theory_rel);
  fx.theory = compile(load_theory_file(path.string()), fx.session);
  fx.store = RelStore(fx.theory);
  for (const auto& entry : std::filesystem::directory_iterator(path.parent_path())) {
    if (entry.path().extension() != ".csv") continue;
    std::string stem = entry.path().stem().string();
    for (auto& c : stem) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (const auto& [key, decl] : fx.theory.relations) {
      if (decl.cls == RelationClass::Database && decl.name == stem) fx.store.merge(load_csv(entry.path().string(), decl));
    }
  }
}

inline Formula F(const std::string& text) { return parse_formula(text); }

}  // namespace aet::testing

#endif  // AET_TESTS_SUPPORT_HPP
