#pragma once

#include "tbtrellis/convcode.hpp"
#include "tbtrellis/errors.hpp"
#include "tbtrellis/gf2poly.hpp"
#include "tbtrellis/oracle.hpp"
#include "tbtrellis/reduction.hpp"
#include "tbtrellis/sequence.hpp"
#include "tbtrellis/synformer.hpp"
#include "tbtrellis/trellis.hpp"
