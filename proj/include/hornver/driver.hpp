#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hornver {

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace hornver
