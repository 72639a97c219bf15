/** Form model for one annotation task.
 *
 * The model makes invalid submit bodies unrepresentable: a hallucinated
 * choice always carries a category, a clean choice never does, and a
 * body can only be built from a complete choice.
 */

export type Category = "object" | "attribute" | "relation";

/** Display and keyboard order of the categories. */
export const CATEGORY_ORDER: readonly Category[] = [
  "object",
  "attribute",
  "relation",
];

export type Choice =
  | { kind: "undecided" }
  | { kind: "clean" }
  | { kind: "hallucinated"; category: Category };

export interface TaskView {
  sampleId: string;
  imageUrl: string;
  description: string;
  choice: Choice;
}

export interface SubmitBody {
  sample_id: string;
  annotator_id: string;
  hallucinated: boolean;
  category: Category | null;
}

export function canSubmit(choice: Choice): boolean {
  return choice.kind !== "undecided";
}

/** Wire body for a completed choice; throws on an incomplete one. */
export function submitBody(task: TaskView, annotatorId: string): SubmitBody {
  const choice = task.choice;
  if (choice.kind === "undecided") {
    throw new Error("cannot submit an undecided choice");
  }
  return {
    sample_id: task.sampleId,
    annotator_id: annotatorId,
    hallucinated: choice.kind === "hallucinated",
    category: choice.kind === "hallucinated" ? choice.category : null,
  };
}

/** Keyboard mapping: 1 = clean, 2/3/4 = hallucinated with the category
 * in CATEGORY_ORDER. Returns null for any other key. */
export function choiceForKey(key: string): Choice | null {
  if (key === "1") return { kind: "clean" };
  const index = ["2", "3", "4"].indexOf(key);
  if (index === -1) return null;
  const category = CATEGORY_ORDER[index];
  return category ? { kind: "hallucinated", category } : null;
}
