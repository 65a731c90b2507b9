#pragma once

#include "tropkm/assignment.hpp"
#include "tropkm/ball.hpp"
#include "tropkm/errors.hpp"
#include "tropkm/field.hpp"
#include "tropkm/fraction.hpp"
#include "tropkm/invariants.hpp"
#include "tropkm/io.hpp"
#include "tropkm/lattice.hpp"
#include "tropkm/linalg.hpp"
#include "tropkm/matrix.hpp"
#include "tropkm/oracle.hpp"
#include "tropkm/precision.hpp"
#include "tropkm/random.hpp"
#include "tropkm/residue.hpp"
#include "tropkm/series.hpp"
#include "tropkm/slir.hpp"
#include "tropkm/webs.hpp"
#include "tropkm/witness.hpp"
