#include "hornver/driver.hpp"

#include <ostream>

namespace hornver {

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
    (void)args;
    (void)out;
    err << "not implemented\n";
    return 2;
}

}  // namespace hornver
