import { z } from "zod";

/**
 * Figure request: which CSV to read, what kind of figure to draw,
 * where to write the SVG, and the annotation values to stamp on it.
 * All statistics arrive precomputed; this package only draws.
 */
export const FigureSpecSchema = z.object({
  input: z.string().min(1),
  kind: z.enum(["hist", "qq"]),
  group: z.string().optional(),
  output: z.string().min(1),
  annotations: z
    .object({
      mu: z.number().optional(),
      sigma: z.number().optional(),
      r2: z.number().optional(),
    })
    .optional(),
});

export type FigureSpec = z.infer<typeof FigureSpecSchema>;

export function parseFigureSpec(jsonText: string): FigureSpec {
  let raw: unknown;
  try {
    raw = JSON.parse(jsonText);
  } catch (e) {
    throw new Error(`spec is not valid JSON: ${(e as Error).message}`);
  }
  const result = FigureSpecSchema.safeParse(raw);
  if (!result.success) {
    const issues = result.error.issues
      .map((i) => `${i.path.join(".") || "(root)"}: ${i.message}`)
      .join("; ");
    throw new Error(`invalid figure spec: ${issues}`);
  }
  return result.data;
}
