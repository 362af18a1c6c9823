//! Rule hints: fixed prose walkthroughs of each task's answer procedure,
//! injected into prompts under the with_hint mode. The texts are data, not
//! documentation; they are kept byte-for-byte stable so prompt hashes do not
//! drift between releases.

pub const TABULAR_FIELD_LOOKUP: &str = r#"To find the value of specific field of record with specified primeKey. You have to first, locate the line with the specific primeKey. Then find the required value under the desired column in that line."#;

pub const TABULAR_COUNT_SALARY_ABOVE: &str = r#"To get the number of people with salary above a threshold, you need to find the table with salary information. Then you go over each line and check the salary field. During the process count only those lines with value of salary strictly greater than the specified threshold towards your final sum. The sum after checking each line is the right answer."#;

pub const TABULAR_COUNT_GENDER: &str = r#"To get the number of female, first find the table with column name ''. Then check each line for field gender, and count these lines with value 'female' towards your final sum. The process applies to finding number of male too."#;

pub const TABULAR_JOIN: &str = r#"To get the number of people living in specified city who are also taller than threshold, you need to first join the two table on primeKey, and check each row of joined table for lines that satisfies both condition, i.e., lines with city specified in query and height strictly greater than threshold. The total number of such rows is the right answer."#;

pub const TREE_HEIGHT: &str = r#"To answer the height of tree, you need to take a recursive strategy. For each node, you will find its height by first finding its children's heights. Then, the height of node is the maximum subtree heights plus 1. The base case occurs when a node has no children, i.e., it's a leaf node. Leaf's height is defined to be 0, without the need of further queries. Then the height the tree is the height of its root node."#;

pub const TREE_NODE_DEPTH: &str = r#"To find the depth of a node, you need to find the number of edges from root to node. You have to start from the root with depth 0 and assign the depth for each node recursively. For any given node, it gets depth of current depth. Increment the depth by 1 before go to its subtree and repeat the process until every node gets a depth."#;

pub const TREE_PATH_WALK: &str = r#"To get the path from root to a node, you need to find recursively. For any node, you can find the path to the target node by find path from its children to target. Then check each child's output, if any child returns with valid path instead of an empty path indicating target-not-found, the path from node to target is that path from its child to target prepended with itself. The answer can be found by searching with root as starting point."#;

pub const JSON_FIND_OBJECT_BY_ID: &str = r#"To find the object with specified id, you need to first parse the json file and get the outermost object, starting from which search the subs field recursively and looking for the desired value in id field for each visited object. Retrieve the content of that object once found."#;

pub const JSON_FIRST_SUB_ID: &str = r#"To find the first object's id of subs, first parse the json file and get the outermost object, in the outermost object's subs list, get the first element. That element is another object, and its id is the answer."#;

pub const JSON_SYNTAX: &str = r#"To find the error in the json file, you need to parse the json file and report any syntax error if encountered any. Potential errors include missing ending curly braces."#;

pub const JSON_PATH_TO_VALUE: &str = r#"To get the path to access specified value. You have to do a recursive search along the subs fields, starting from the outermost parsed object. For each visited object, check each fields except for subs, and record the path along the way, i.e., subs inside brackets and index into subs inside brackets, and at which field you find the value."#;

pub const JSON_DEEPEST_OBJECTS: &str = r#"To get the most deeply nested objects, start from the outermost object, recursively search along the subs fields. For each object, check its subs field, any object with an empty subs is one most deeply nested object."#;

pub const YAML_FIND_OBJECT_BY_ID: &str = r#"To find the object with specified id, you need to first parse the yaml file and get the outermost object, starting from which search the subs field recursively and looking for the desired value in id field for each visited object. Retrieve the content of that object once found."#;

pub const YAML_FIRST_SUB_ID: &str = r#"To find the first object's id of subs, first parse the yaml file and get the outermost object, in the outermost object's subs list, get the first element. That element is another object, and its id is the answer."#;

pub const YAML_SYNTAX: &str = r#"To find the error in the yaml file, you need to parse the yaml file and report any syntax error if encountered any. Potential errors include missing key before colon."#;

pub const YAML_PATH_TO_VALUE: &str = r#"To get the path to access specified value. You have to do a recursive search along the subs fields, starting from the outermost parsed object. For each visited object, check each fields except for subs, and record the path along the way, i.e., subs inside brackets and index into subs inside brackets, and at which field you find the value."#;

pub const YAML_DEEPEST_OBJECTS: &str = r#"To get the most deeply nested objects, start from the outermost object, recursively search along the subs fields. For each object, check its subs field, any object with an empty subs is one most deeply nested object."#;

pub const XML_TAG_CONTENT: &str = r#"To find the content of a specific tag, you need to search for desired tag throughout the xml file. Once located, find the surrounding left and right angle, these area is tha starting tag. Then find the ending tag, which is the tag surrounded by angle with exception that right angle is preceded by a slash. The content between starting and ending tags is the answer."#;

pub const XML_TAG_OF_ATTR_VALUE: &str = r#"To find the tag name of particular attribute value, just search the file for that value and find the surrounding left and right angles, i.e., boundary of tag. The word next to left angle is tag name."#;

pub const XML_SYNTAX: &str = r#"To find the error in the xml file, you need to parse the xml file and report any syntax error if encountered any. Potential errors include missing ending tags."#;

pub const MARKDOWN_BOLD_TEXTS: &str = r#"To find the bold texts, search for double stars, i.e., **, the content between two occurrences of double stars is the bold texts. Note that the bold range should start from the double stars occurring at i-th spot throughout the whole input file, where i is odd, and end with double stars occurring at jth spot where j is even. For example, text between double stars appearing first and second time."#;

pub const MARKDOWN_SECTION_CONTENT: &str = r#"To find the content of certain section, starting from the headings start with one hashtag, and go to the ith heading as specified in number of sections. Then start from that line, look for j-th heading with 2 hashtags as specified in subsection number. For kth subsubsection, look for kth heading with 3 hashtags starting from the located subsubsection. Stop searching early if the subsection or subsubsection is not queried."#;

pub const MARKDOWN_IMAGE_FILES: &str = r#"To find the image files, look for texts matching ![*](TARGET "*"), the TARGET part is filename. Star means any text is possible."#;

pub const LATEX_BOLD_TEXTS: &str = r#"To find the bold texts, search for macro textbf, and everything after \\textbf{ and before the first } encountered is bold text."#;

pub const LATEX_SECTION_CONTENT: &str = r#"Note that section title is enclosed by \\section{}, and \\subsection for subsection, \\subsubsection for subsubsection. To find the content of certain section, look for ith section as specified, and start from there look for jth subsection. And from located subsection, look for kth subsubsection as queried. Search may stop early if subsection or subsubsection is not queried."#;

pub const LATEX_IMAGE_FILES: &str = r#"To find the image files imported, search for pattern \\includegraphics[*]{TARGET}, the TARGET part is the filename. Star means any text is possible."#;

pub const ORG_BOLD_TEXTS: &str = r#"To find the bold texts, search for single star, i.e., *, the content between two occurrences of single star is the bold texts. Note that the bold range should start from the single star occurring at i-th spot throughout the whole input file, where i is odd, and end with single star occurring at jth spot where j is even. For example, text between single star appearing first and second time."#;

pub const ORG_SECTION_CONTENT: &str = r#"Note that section, subsection, subsubsection titles are preceded by *, **, *** respectively, with one or more whitespaces in between.  To find the content of certain section, look for ith section as specified, and start from there look for jth subsection. And from located subsection, look for kth subsubsection as queried. Search may stop early if subsection or subsubsection is not queried."#;

pub const ORG_IMAGE_FILES: &str = r#"To find the image files, look for texts matching [[TARGET]], the TARGET part is filename"#;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hints_are_single_paragraphs() {
        let all = [
            TABULAR_FIELD_LOOKUP,
            TABULAR_COUNT_SALARY_ABOVE,
            TABULAR_COUNT_GENDER,
            TABULAR_JOIN,
            TREE_HEIGHT,
            TREE_NODE_DEPTH,
            TREE_PATH_WALK,
            JSON_FIND_OBJECT_BY_ID,
            JSON_FIRST_SUB_ID,
            JSON_SYNTAX,
            JSON_PATH_TO_VALUE,
            JSON_DEEPEST_OBJECTS,
            YAML_FIND_OBJECT_BY_ID,
            YAML_FIRST_SUB_ID,
            YAML_SYNTAX,
            YAML_PATH_TO_VALUE,
            YAML_DEEPEST_OBJECTS,
            XML_TAG_CONTENT,
            XML_TAG_OF_ATTR_VALUE,
            XML_SYNTAX,
            MARKDOWN_BOLD_TEXTS,
            MARKDOWN_SECTION_CONTENT,
            MARKDOWN_IMAGE_FILES,
            LATEX_BOLD_TEXTS,
            LATEX_SECTION_CONTENT,
            LATEX_IMAGE_FILES,
            ORG_BOLD_TEXTS,
            ORG_SECTION_CONTENT,
            ORG_IMAGE_FILES,
        ];
        assert_eq!(all.len(), 29);
        for h in all {
            assert!(!h.is_empty());
            assert!(!h.contains('\n'), "hints are one paragraph each");
        }
    }

    #[test]
    fn json_and_yaml_variants_differ_only_in_format_name() {
        assert_eq!(
            JSON_FIND_OBJECT_BY_ID.replace("json", "yaml"),
            YAML_FIND_OBJECT_BY_ID
        );
        assert_eq!(JSON_FIRST_SUB_ID.replace("json", "yaml"), YAML_FIRST_SUB_ID);
        assert_eq!(JSON_PATH_TO_VALUE, YAML_PATH_TO_VALUE);
        assert_eq!(JSON_DEEPEST_OBJECTS, YAML_DEEPEST_OBJECTS);
    }
}
