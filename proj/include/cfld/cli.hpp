#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cfld::cli {

// Column order of every CSV report.
inline constexpr const char* kCsvColumns =
    "event,n,x,y,method,value,ci_low,ci_high,limit_constant,normalized,samples,seed";

// Seed used when --seed is absent; overridden by the CFLD_SEED environment variable.
inline constexpr unsigned long long kDefaultSeed = 42;

int run(int argc, char** argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cfld::cli
