/** Runtime schema for submit bodies, mirroring the server's
 * AnnotationRecord invariants (category present iff hallucinated). Used
 * by the contract tests to validate every body the client produces. */

import { z } from "zod";

export const categorySchema = z.enum(["object", "attribute", "relation"]);

export const annotationRecordSchema = z
  .object({
    sample_id: z.string().min(1),
    annotator_id: z.string().min(1),
    hallucinated: z.boolean(),
    category: categorySchema.nullable(),
  })
  .strict()
  .refine((body) => body.hallucinated === (body.category !== null), {
    message: "category must be present exactly when hallucinated",
    path: ["category"],
  });

export type AnnotationRecordBody = z.infer<typeof annotationRecordSchema>;
