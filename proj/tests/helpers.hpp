#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "xrml/parser.hpp"

namespace testutil {

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string fixture_text(const std::string& name) {
    return slurp(std::string(XRML_FIXTURE_DIR) + "/" + name);
}

struct Loaded {
    xrml::Declarations decls;
    xrml::Query query;
};

inline Loaded load_fixture(const std::string& base, bool negation = false) {
    xrml::Workspace ws = xrml::parse_license_file(fixture_text(base + ".lic"), negation,
                                                  base + ".lic");
    xrml::ConcPtr goal = xrml::parse_query(fixture_text(base + ".q"), ws.decls, base + ".q");
    return {ws.decls, ws.make_query(goal)};
}

inline Loaded load_fixture(const std::string& lic, const std::string& q, bool negation) {
    xrml::Workspace ws = xrml::parse_license_file(fixture_text(lic + ".lic"), negation,
                                                  lic + ".lic");
    xrml::ConcPtr goal = xrml::parse_query(fixture_text(q + ".q"), ws.decls, q + ".q");
    return {ws.decls, ws.make_query(goal)};
}

}  // namespace testutil
