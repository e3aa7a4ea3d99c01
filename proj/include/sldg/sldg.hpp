#pragma once

#include "legendre.hpp"
#include "mixed_storage.hpp"
#include "projection.hpp"
#include "snapshot.hpp"
#include "shift.hpp"
#include "advection.hpp"
#include "parallel.hpp"
#include "phase_space.hpp"
#include "vlasov.hpp"
#include "bench.hpp"
#include "commands.hpp"
