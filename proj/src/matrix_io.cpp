#include "infoplan/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace infoplan {

namespace {

void put(std::ostream& os, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void write_joint_gaussian(std::ostream& os, const JointGaussian& jg) {
  const std::size_t n = jg.catalog.size();
  os << "infoplan-cov 1\n";
  os << "catalog " << n << (jg.verification_is_state ? " v-is-state" : "") << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    os << i << ' ';
    if (jg.catalog.is_verification(i)) os << 'V';
    else os << jg.catalog.tag(i);
    os << '\n';
  }
  os << "noise\n";
  for (std::size_t i = 0; i < n; ++i) {
    if (i) os << ' ';
    put(os, jg.noise[i]);
  }
  os << "\nmean\n";
  for (std::size_t i = 0; i < n; ++i) {
    if (i) os << ' ';
    put(os, jg.mean.size() ? jg.mean(static_cast<Eigen::Index>(i)) : 0.0);
  }
  os << "\ncov\n";
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (c) os << ' ';
      put(os, jg.cov(r, c));
    }
    os << '\n';
  }
}

JointGaussian read_joint_gaussian(std::istream& is) {
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != "infoplan-cov" || version != 1)
    throw ArgumentError("not an infoplan-cov version 1 file");
  std::string kw;
  std::size_t n = 0;
  is >> kw >> n;
  if (kw != "catalog") throw ArgumentError("expected 'catalog' header");
  JointGaussian jg;
  std::string rest;
  std::getline(is, rest);
  if (rest.find("v-is-state") != std::string::npos) jg.verification_is_state = true;

  std::vector<int> tags(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t idx;
    std::string tag;
    is >> idx >> tag;
    if (idx != i) throw ArgumentError("catalog entries out of order");
    tags[i] = (tag == "V") ? -1 : std::stoi(tag);
  }
  jg.catalog = VariableCatalog(std::move(tags));

  is >> kw;
  if (kw != "noise") throw ArgumentError("expected 'noise' section");
  jg.noise.resize(n);
  for (std::size_t i = 0; i < n; ++i) is >> jg.noise[i];

  is >> kw;
  if (kw != "mean") throw ArgumentError("expected 'mean' section");
  jg.mean.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) is >> jg.mean(static_cast<Eigen::Index>(i));

  is >> kw;
  if (kw != "cov") throw ArgumentError("expected 'cov' section");
  jg.cov.resize(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) is >> jg.cov(r, c);
  if (!is) throw ArgumentError("truncated infoplan-cov file");
  return jg;
}

void save_joint_gaussian(const std::string& path, const JointGaussian& jg) {
  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot open '" + path + "' for writing");
  write_joint_gaussian(os, jg);
}

JointGaussian load_joint_gaussian(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ArgumentError("cannot open '" + path + "'");
  return read_joint_gaussian(is);
}

}  // namespace infoplan
