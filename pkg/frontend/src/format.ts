/** Display helpers. Rounding happens only here: the panels never do model
 * arithmetic, they show whatever the service sent. */

export function fmt(value: number | null | undefined, decimals = 2): string {
  if (value === null || value === undefined || !Number.isFinite(value)) return "n/a";
  const scale = 10 ** decimals;
  // round half away from zero so displayed figures match hand-rounded tables
  const rounded = Math.sign(value) * Math.round(Math.abs(value) * scale) / scale;
  return rounded.toFixed(decimals);
}

export function fmtSigned(value: number, decimals = 2): string {
  const text = fmt(value, decimals);
  return value >= 0 ? `+${text}` : text;
}

export function percent(value: number, total: number): number {
  return total > 0 ? (100 * value) / total : 0;
}
