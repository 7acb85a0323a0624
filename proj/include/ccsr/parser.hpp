#pragma once

#include <string>

#include "ccsr/process.hpp"

namespace ccsr {

struct Parsed {
  Process main;
  Env env;
};

// Parses a CCS source text: any number of definitions `Name(x,y) = p`
// followed by (or interleaved with) exactly one main process expression.
// `#` starts a line comment. Throws ParseError / ValidationError.
Parsed parse(const std::string& text);

// Parses a single process expression with no definitions.
Process parse_process(const std::string& text);

// Parses an action token: `x`, `~x`, or `tau`.
Action parse_action_text(const std::string& text);

// Parses a comma-separated action list into an observable set.
ObsSet parse_obs(const std::string& csv);

}  // namespace ccsr
