

class EulerChaosError(Exception):
  pass


class InvalidArgument(EulerChaosError, ValueError):
  pass


class OutOfRange(EulerChaosError, ValueError):
  pass


class Unsupported(EulerChaosError, NotImplementedError):
  pass


class DegenerateFamily(EulerChaosError, ZeroDivisionError):
  pass


class NumericFailure(EulerChaosError, ArithmeticError):
  def __init__(self, step, t, x, particle=None):
    self.step = step
    self.t = t
    self.x = x
    self.particle = particle

    where = f"step {step} (t={t:.6g})" if particle is None\
      else f"step {step} (t={t:.6g}), particle {particle}"
    super().__init__(f"non-finite coefficient at {where}, x={x}")


class BoundViolation(EulerChaosError):
  def __init__(self, step, quantity, value, bound):
    self.step = step
    self.quantity = quantity
    self.value = value
    self.bound = bound
    super().__init__(
      f"bound violated at step {step}: {quantity}={value:.6g} (bound {bound:.6g})")


class ConfigError(EulerChaosError, ValueError):
  def __init__(self, message, key=None, line=None):
    self.key = key
    self.line = line
    where = "" if line is None else f"line {line}: "
    super().__init__(f"{where}{message}")
