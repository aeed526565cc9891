#ifndef DIELENS_DIELENS_HPP
#define DIELENS_DIELENS_HPP

// Everything except the CLI front end, which pulls in CLI11 and is opt-in
// via dielens/cli.hpp.

#include "dielens/config.hpp"
#include "dielens/constants.hpp"
#include "dielens/effmed.hpp"
#include "dielens/errors.hpp"
#include "dielens/io.hpp"
#include "dielens/lens.hpp"
#include "dielens/solid.hpp"
#include "dielens/tmm.hpp"
#include "dielens/transformer.hpp"

#endif
