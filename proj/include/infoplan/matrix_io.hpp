#pragma once

#include <iosfwd>
#include <string>

#include "infoplan/gaussian.hpp"

namespace infoplan {

/// Self-describing text format for a JointGaussian:
///
///   infoplan-cov 1
///   catalog N
///   <index> <tag>        one line per variable; tag is a region id or V
///   noise
///   r_0 ... r_{N-1}
///   mean
///   m_0 ... m_{N-1}
///   cov
///   N rows of N entries
///
/// Values round-trip exactly (%.17g).
void write_joint_gaussian(std::ostream& os, const JointGaussian& jg);
JointGaussian read_joint_gaussian(std::istream& is);

void save_joint_gaussian(const std::string& path, const JointGaussian& jg);
JointGaussian load_joint_gaussian(const std::string& path);

}  // namespace infoplan
