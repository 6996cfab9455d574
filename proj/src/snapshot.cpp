#include "lowmach/snapshot.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace lowmach {

void write_snapshot(const std::string& path, const ScalarField& f, const std::string& name, double time) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path + " for writing");
  const DomainSpec& d = f.domain();
  out << std::setprecision(17);
  out << "LOWMACH-SNAPSHOT 1\n"
      << "geometry " << to_string(d.geometry) << "\n"
      << "nx " << d.nx << "\n"
      << "ny " << d.ny << "\n"
      << "lx " << d.lx << "\n"
      << "ly " << d.ly << "\n"
      << "parity " << to_string(f.parity()) << "\n"
      << "name " << name << "\n"
      << "time " << time << "\n"
      << "rows " << f.rows() << "\n"
      << "end\n";
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.values().size() * sizeof(double)));
  if (!out) throw InputError("short write to " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line != "LOWMACH-SNAPSHOT 1") throw InputError(path + ": not a snapshot file");
  std::map<std::string, std::string> kv;
  while (std::getline(in, line) && line != "end") {
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw InputError(path + ": malformed header line '" + line + "'");
    kv[line.substr(0, sp)] = line.substr(sp + 1);
  }
  try {
    DomainSpec d;
    d.geometry = geometry_from_string(kv.at("geometry"));
    d.nx = std::stoi(kv.at("nx"));
    d.ny = std::stoi(kv.at("ny"));
    d.lx = std::stod(kv.at("lx"));
    d.ly = std::stod(kv.at("ly"));
    d.validate();
    const Parity p = parity_from_string(kv.at("parity"));
    std::vector<double> v(static_cast<std::size_t>(d.rows(p)) * d.nx);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in) throw InputError(path + ": truncated data");
    return {ScalarField(d, p, std::move(v)), kv.at("name"), std::stod(kv.at("time"))};
  } catch (const std::out_of_range&) {
    throw InputError(path + ": missing header key");
  } catch (const ConfigError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_field_csv(const std::string& path, const ScalarField& f) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out << std::setprecision(17) << "x,y,value\n";
  for (int j = 0; j < f.rows(); ++j)
    for (int i = 0; i < f.nx(); ++i) out << f.x(i) << ',' << f.y(j) << ',' << f(i, j) << '\n';
}

}  // namespace lowmach
