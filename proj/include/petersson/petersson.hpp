#pragma once

#include "petersson/arith.hpp"
#include "petersson/bessel.hpp"
#include "petersson/certified.hpp"
#include "petersson/character.hpp"
#include "petersson/errors.hpp"
#include "petersson/kloosterman.hpp"
#include "petersson/lfunctions.hpp"
#include "petersson/moments.hpp"
#include "petersson/parallel.hpp"
#include "petersson/report_io.hpp"
#include "petersson/summation.hpp"
#include "petersson/trace.hpp"
