#pragma once

#include "magkit/error.hpp"
#include "magkit/tolerances.hpp"
#include "magkit/metric_space.hpp"
#include "magkit/magnitude.hpp"
#include "magkit/embedding.hpp"
#include "magkit/matrix_identities.hpp"
#include "magkit/subspace.hpp"
#include "magkit/asymptotics.hpp"
#include "magkit/spd.hpp"
#include "magkit/io.hpp"
