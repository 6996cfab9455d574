#pragma once

#include <string>

#include "lowmach/domain.hpp"

namespace lowmach {

struct Snapshot {
  ScalarField field;
  std::string name;
  double time = 0.0;
};

// Text header (one "key value" pair per line, terminated by "end") followed by
// row-major little-endian float64 samples.
void write_snapshot(const std::string& path, const ScalarField& f, const std::string& name, double time);
Snapshot read_snapshot(const std::string& path);

// x,y,value per grid node.
void write_field_csv(const std::string& path, const ScalarField& f);

}  // namespace lowmach
