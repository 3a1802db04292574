#pragma once

#include "volocc/config.hpp"
#include "volocc/csv.hpp"
#include "volocc/density.hpp"
#include "volocc/grid.hpp"
#include "volocc/mc.hpp"
#include "volocc/models.hpp"
#include "volocc/occupation.hpp"
#include "volocc/oracle.hpp"
#include "volocc/rng.hpp"
#include "volocc/simulate.hpp"
#include "volocc/spotvol.hpp"
